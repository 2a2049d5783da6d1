using System;
using System.Collections.Generic;
using System.Web.Mvc;
using Shop.Business.Models;
using Shop.Business.Services;

namespace Shop.Web.Controllers
{
    /// <summary>
    /// Storefront order endpoints.
    /// </summary>
    public class OrderController : Controller
    {
        private OrderService orderService = new OrderService();
        private PricingService pricing = new PricingService();

        [HttpPost]
        public int SubmitOrder(int customerId, List<OrderLine> lines)
        {
            // quote first so an empty basket never reaches orderService.PlaceOrder
            Order order = new Order(customerId);
            decimal quote = pricing.Quote(lines);
            if (quote <= 0)
            {
                throw new ArgumentException("empty basket: lines.Count == 0");
            }
            int id = orderService.PlaceOrder(order, lines);
            Console.WriteLine("placed order {0}", id);
            return id;
        }

        public List<Order> History(int customerId)
        {
            return orderService.GetHistory(customerId);
        }
    }
}
