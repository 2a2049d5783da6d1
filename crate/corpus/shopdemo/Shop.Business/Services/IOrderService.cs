using System.Collections.Generic;
using Shop.Business.Models;

namespace Shop.Business.Services
{
    public interface IOrderService
    {
        int PlaceOrder(Order order, List<OrderLine> lines);
        void Checkout(int customerId);
    }
}
