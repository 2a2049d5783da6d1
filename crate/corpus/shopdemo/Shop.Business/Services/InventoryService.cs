using System;
using Shop.Data.Repositories;

namespace Shop.Business.Services
{
    public class InventoryService
    {
        private ProductRepository stock = new ProductRepository();

        public int Available(int productId)
        {
            return stock.CountOf(productId);
        }

        public void Reserve(int productId, int quantity)
        {
            stock.Decrement(productId, quantity);
        }

        public int GetCount()
        {
            return stock.Total();
        }
    }
}
