using System;
using System.Collections.Generic;
using Acme.Logging;
using Shop.Business.Models;
using Shop.Data.Repositories;

namespace Shop.Business.Services
{
    public class OrderService : BaseService, IOrderService
    {
        private OrderRepository repository = new OrderRepository();
        private InventoryService inventory = new InventoryService();
        private NotificationService notifier = new NotificationService();

        public int PlaceOrder(Order order, List<OrderLine> lines)
        {
            this.Validate(order);
            foreach (OrderLine line in lines)
            {
                inventory.Reserve(line.ProductId, line.Quantity);
            }
            order.AddLines(lines);
            int id = repository.Save(order);
            notifier.OrderPlaced(order.CustomerId, id);
            Log.Info("order placed");
            return id;
        }

        public void Checkout(int customerId)
        {
            List<Order> open = repository.FindOpen(customerId);
            foreach (Order o in open)
            {
                o.Close();
            }
            repository.Save(open);
        }

        public List<Order> GetHistory(int customerId)
        {
            return repository.FindByCustomer(customerId);
        }
    }
}
